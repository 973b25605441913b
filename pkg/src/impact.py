"""
Оценка эффекта закона об открытом доступе сегментированной регрессией.

Модель линейной вероятности по работам:

    Y = b0 + b1*T + b2*D + b3*P + (эффекты месяца) + e

Y = 1, если работа депонирована в аргентинском репозитории; T - недели от
начала окна; D = 1 после даты закона; P - недели от даты закона (0 до неё).
"""

import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, replace
from datetime import date
from typing import Any

import numpy as np
from numpy.typing import NDArray
from scipy import linalg as la
from scipy import stats

from config import logger
from harvester import WorkRecord

RANK_TOLERANCE = 1e-10
BASE_COLUMNS = ("const", "T", "D", "P")
MONTH_COLUMNS = tuple(f"month_{m}" for m in range(2, 13))


class RegressionError(Exception):
    """Базовая ошибка оценки регрессии"""

    pass


class SingularDesignError(RegressionError):
    """Матрица плана вырождена; columns - коллинеарные столбцы"""

    def __init__(self, columns: Sequence[str]):
        self.columns = tuple(columns)
        super().__init__(f"Design matrix is rank deficient; collinear columns: {', '.join(self.columns)}")


class InsufficientDataError(RegressionError):
    def __init__(self, n_obs: int, n_params: int):
        self.n_obs = n_obs
        self.n_params = n_params
        super().__init__(f"Need more than {n_params} observations, got {n_obs}")


@dataclass(frozen=True, slots=True)
class RegressionObservation:
    y: int
    t_weeks: int
    d_post: int
    p_weeks: int
    month_index: int
    imputed: bool = False
    work_id: str = ""

    def __post_init__(self):
        if self.y not in (0, 1) or self.d_post not in (0, 1):
            raise ValueError("y and d_post must be binary")
        if self.t_weeks < 0 or self.p_weeks < 0:
            raise ValueError("Week counts must be non-negative")
        if self.d_post == 0 and self.p_weeks != 0:
            raise ValueError("p_weeks must be 0 before the law date")
        if self.p_weeks > self.t_weeks:
            raise ValueError("p_weeks must not exceed t_weeks")
        if not 1 <= self.month_index <= 12:
            raise ValueError(f"Invalid month_index {self.month_index}")


@dataclass(frozen=True)
class OLSResult:
    coef: NDArray[np.float64]
    cov: NDArray[np.float64]
    residuals: NDArray[np.float64]
    sigma2: float
    df_resid: int


@dataclass(frozen=True)
class RegressionFit:
    beta0: float
    beta1: float
    beta2: float
    beta3: float
    month_effects: dict[str, float]
    standard_errors: dict[str, float]
    t_stats: dict[str, float]
    p_values: dict[str, float]
    n_obs: int
    r_squared: float
    columns: tuple[str, ...] = BASE_COLUMNS
    robust: bool = False
    imputed_dates: int = 0

    def __post_init__(self):
        for name, p in self.p_values.items():
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"p-value of {name} out of range: {p}")
        if self.n_obs <= len(self.columns):
            raise ValueError("n_obs must exceed the number of parameters")

    @property
    def coefficients(self) -> dict[str, float]:
        return {"const": self.beta0, "T": self.beta1, "D": self.beta2, "P": self.beta3, **self.month_effects}

    def to_dict(self) -> dict[str, Any]:
        return {
            "coefficients": self.coefficients,
            "standard_errors": self.standard_errors,
            "t_stats": self.t_stats,
            "p_values": self.p_values,
            "n_obs": self.n_obs,
            "r_squared": self.r_squared,
            "month_effects": bool(self.month_effects),
            "robust": self.robust,
            "imputed_dates": self.imputed_dates,
        }


@dataclass(frozen=True, slots=True)
class WeeklyPoint:
    t_weeks: int
    deposit_proportion: float
    n: int


@dataclass(frozen=True, slots=True)
class TrendPoint:
    t_weeks: int
    fitted_pre_trend: float
    fitted_segmented: float


# ===== Наблюдения =====


def week_index(d: date, origin: date) -> int:
    """Полные недели от origin до d."""
    return (d - origin).days // 7


def law_week(window_start: date, law_date: date) -> int:
    """
    Неделя окна, в которую попадает дата закона.

    Это первая неделя с наблюдениями d_post = 1; той же границей пользуется fitted_trend.
    """
    return week_index(law_date, window_start)


def build_observations(
    works: Iterable[WorkRecord],
    is_deposited: Callable[[WorkRecord], bool],
    window_start: date = date(2006, 1, 1),
    law_date: date = date(2014, 1, 1),
    cutoff: date = date(2020, 12, 31),
) -> list[RegressionObservation]:
    """
    Наблюдение на каждую работу с датой в [window_start, cutoff].

    Args:
        works: Работы корпуса
        is_deposited: Признак Y (есть URL аргентинского репозитория)
        window_start: Начало окна (T = 0)
        law_date: Дата вступления закона (D, P)
        cutoff: Последняя учитываемая дата

    Returns:
        Наблюдения в порядке (t_weeks, work_id); даты без месяца/дня
        подставлены (1 июля / 1 число) и помечены imputed
    """
    if not window_start < law_date <= cutoff:
        raise ValueError("Expected window_start < law_date <= cutoff")

    observations = []
    for work in works:
        d, imputed = work.publication_date.to_date()
        if not window_start <= d <= cutoff:
            continue
        d_post = int(d >= law_date)
        observations.append(
            RegressionObservation(
                y=int(is_deposited(work)),
                t_weeks=week_index(d, window_start),
                d_post=d_post,
                p_weeks=week_index(d, law_date) if d_post else 0,
                month_index=d.month,
                imputed=imputed,
                work_id=work.work_id,
            )
        )
    observations.sort(key=lambda o: (o.t_weeks, o.work_id))
    return observations


# ===== МНК =====


def ols_solve(
    X: NDArray[np.float64], y: NDArray[np.float64], names: Sequence[str] | None = None, robust: bool = False
) -> OLSResult:
    """
    МНК через QR-разложение с выбором ведущего столбца.

    Ковариация классическая (sigma2 * (X'X)^-1) или HC1 при robust=True.

    Raises:
        InsufficientDataError: строк меньше, чем столбцов
        SingularDesignError: диагональ R ниже 1e-10 от наибольшей
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    n, k = X.shape
    names = list(names) if names is not None else [f"x{j}" for j in range(k)]
    if n < k:
        raise InsufficientDataError(n, k)

    Q, R, piv = la.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > RANK_TOLERANCE * diag[0])) if k and diag[0] > 0 else 0
    if rank < k:
        raise SingularDesignError([names[j] for j in sorted(piv[rank:])])

    coef = np.empty(k)
    coef[piv] = la.solve_triangular(R, Q.T @ y)
    residuals = y - X @ coef
    df_resid = n - k
    rss = float(residuals @ residuals)
    sigma2 = rss / df_resid if df_resid > 0 else math.nan

    r_inv = la.solve_triangular(R, np.eye(k))
    xtx_inv = np.empty((k, k))
    xtx_inv[np.ix_(piv, piv)] = r_inv @ r_inv.T

    if robust and df_resid > 0:
        meat = (X * residuals[:, None] ** 2).T @ X
        cov = (n / df_resid) * xtx_inv @ meat @ xtx_inv
    else:
        cov = sigma2 * xtx_inv
    return OLSResult(coef=coef, cov=cov, residuals=residuals, sigma2=sigma2, df_resid=df_resid)


def _t_and_p(coef: float, se: float, df: int) -> tuple[float, float]:
    if se > 0:
        t = coef / se
        return t, float(min(1.0, 2.0 * stats.t.sf(abs(t), df)))
    # Нулевая дисперсия: коэффициент либо точно 0, либо определён без ошибки
    if coef == 0:
        return 0.0, 1.0
    return math.copysign(math.inf, coef), 0.0


def design_matrix(
    t: NDArray, d: NDArray, p: NDArray, month: NDArray | None = None
) -> tuple[NDArray[np.float64], tuple[str, ...]]:
    """[1, T, D, P] и, если даны месяцы, 11 фиктивных переменных (январь - база)."""
    columns = [np.ones(len(t)), np.asarray(t, float), np.asarray(d, float), np.asarray(p, float)]
    names = list(BASE_COLUMNS)
    if month is not None:
        month = np.asarray(month)
        for m in range(2, 13):
            columns.append((month == m).astype(float))
        names.extend(MONTH_COLUMNS)
    return np.column_stack(columns), tuple(names)


def fit_segmented_arrays(
    y: NDArray,
    t: NDArray,
    d: NDArray,
    p: NDArray,
    month: NDArray | None = None,
    robust: bool = False,
) -> RegressionFit:
    """Оценка модели по массивам (month=None - без эффектов месяца)."""
    X, names = design_matrix(t, d, p, month)
    y = np.asarray(y, dtype=np.float64)
    n, k = X.shape
    if n <= k:
        raise InsufficientDataError(n, k)

    result = ols_solve(X, y, names, robust=robust)
    se = np.sqrt(np.clip(np.diag(result.cov), 0.0, None))

    tss = float(np.sum((y - y.mean()) ** 2))
    rss = float(result.residuals @ result.residuals)
    r_squared = 1.0 - rss / tss if tss > 0 else 0.0

    coef = {name: float(c) for name, c in zip(names, result.coef, strict=True)}
    errors = {name: float(s) for name, s in zip(names, se, strict=True)}
    t_stats, p_values = {}, {}
    for name in names:
        t_stats[name], p_values[name] = _t_and_p(coef[name], errors[name], result.df_resid)

    return RegressionFit(
        beta0=coef["const"],
        beta1=coef["T"],
        beta2=coef["D"],
        beta3=coef["P"],
        month_effects={name: coef[name] for name in names if name in MONTH_COLUMNS},
        standard_errors=errors,
        t_stats=t_stats,
        p_values=p_values,
        n_obs=n,
        r_squared=r_squared,
        columns=names,
        robust=robust,
    )


def fit_segmented(
    obs: Sequence[RegressionObservation], include_month_effects: bool = True, robust: bool = False
) -> RegressionFit:
    """
    Сегментированная регрессия по наблюдениям.

    Raises:
        InsufficientDataError: наблюдений не больше числа параметров
        SingularDesignError: вырожденный план (например, месяц без наблюдений)
    """
    n_params = len(BASE_COLUMNS) + (len(MONTH_COLUMNS) if include_month_effects else 0)
    if len(obs) <= n_params:
        raise InsufficientDataError(len(obs), n_params)

    y = np.fromiter((o.y for o in obs), dtype=float, count=len(obs))
    t = np.fromiter((o.t_weeks for o in obs), dtype=float, count=len(obs))
    d = np.fromiter((o.d_post for o in obs), dtype=float, count=len(obs))
    p = np.fromiter((o.p_weeks for o in obs), dtype=float, count=len(obs))
    month = None
    if include_month_effects:
        month = np.fromiter((o.month_index for o in obs), dtype=int, count=len(obs))

    fit = fit_segmented_arrays(y, t, d, p, month, robust=robust)
    imputed = sum(o.imputed for o in obs)
    logger.info(
        f"Segmented fit (month effects {'on' if include_month_effects else 'off'}): "
        f"n={fit.n_obs}, beta2={fit.beta2:.4f}, p={fit.p_values['D']:.3g}"
    )
    return replace(fit, imputed_dates=imputed)


# ===== Ряды для графиков =====


def weekly_deposit_series(obs: Iterable[RegressionObservation]) -> list[WeeklyPoint]:
    """Доля депонированных работ по неделям; недели без работ пропускаются."""
    totals: dict[int, list[int]] = {}
    for o in obs:
        bucket = totals.setdefault(o.t_weeks, [0, 0])
        bucket[0] += o.y
        bucket[1] += 1
    return [WeeklyPoint(week, deposited / n, n) for week, (deposited, n) in sorted(totals.items())]


def fitted_trend(fit: RegressionFit, t_weeks: Iterable[int], law_week: int) -> list[TrendPoint]:
    """
    Линии тренда: продолжение доправового тренда (b0 + b1*T) и
    сегментированная модель (b0 + b1*T + b2*D + b3*P) без эффектов месяца.
    """
    points = []
    for t in t_weeks:
        pre = fit.beta0 + fit.beta1 * t
        d = 1 if t >= law_week else 0
        p = t - law_week if d else 0
        points.append(TrendPoint(t, pre, pre + fit.beta2 * d + fit.beta3 * p))
    return points

