# src/api/base.py

import asyncio
import json
import logging
from typing import Any

import aiohttp
from tenacity import (
    AsyncRetrying,
    RetryError,
    before_sleep_log,
    retry_if_exception_type,
    stop_after_attempt,
    wait_exponential,
)
from tenacity.wait import wait_base

from .rate_limit import SlidingWindowRateLimiter

logger = logging.getLogger(__name__)


class APIError(Exception):
    """Базовое исключение для API"""

    pass


class APIConnectionError(APIError):
    """Сетевая ошибка или 429/5xx после всех повторов"""

    def __init__(self, message: str, status: int | None = None):
        self.status = status
        super().__init__(message)


class APIClientError(APIError):
    """Клиентская ошибка 4xx (кроме 429), повтор не имеет смысла"""

    def __init__(self, message: str, status: int):
        self.status = status
        super().__init__(message)


class APIDecodeError(APIError):
    """Тело ответа не является корректным JSON"""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(message)


class _RetryableStatus(Exception):
    """Внутренний сигнал для tenacity: 429 или 5xx"""

    def __init__(self, status: int):
        self.status = status
        super().__init__(f"HTTP {status}")


def decode_json(body: bytes, source: str) -> dict[str, Any]:
    """
    Декодирует JSON-тело ответа.

    Raises:
        APIDecodeError: с байтовым смещением места ошибки
    """
    try:
        text = body.decode("utf-8")
        data = json.loads(text)
    except UnicodeDecodeError as e:
        message = f"Malformed payload from {source}: invalid UTF-8 at byte {e.start}"
        raise APIDecodeError(message, e.start) from e
    except json.JSONDecodeError as e:
        offset = len(text[: e.pos].encode("utf-8"))
        raise APIDecodeError(f"Malformed payload from {source}: {e.msg} at byte {offset}", offset) from e
    if not isinstance(data, dict):
        raise APIDecodeError(f"Malformed payload from {source}: expected a JSON object", 0)
    return data


class BaseAPIClient:
    """Базовый клиент для работы с внешним API"""

    def __init__(
        self,
        base_url: str,
        headers: dict,
        timeout: int = 30,
        rate_limiter: SlidingWindowRateLimiter | None = None,
        max_retries: int = 4,
        retry_wait: wait_base | None = None,
        concurrency: int = 4,
    ):
        self.base_url = base_url.rstrip("/")
        self.headers = headers
        self.timeout = aiohttp.ClientTimeout(total=timeout)
        self._session: aiohttp.ClientSession | None = None
        self.rate_limiter = rate_limiter
        self.max_retries = max_retries
        self.retry_wait = retry_wait or wait_exponential(multiplier=0.5, min=0.5, max=8)
        self._semaphore = asyncio.Semaphore(concurrency)
        self.request_count = 0

    async def _get_session(self) -> aiohttp.ClientSession:
        """Получить или создать HTTP сессию"""
        if self._session is None or self._session.closed:
            self._session = aiohttp.ClientSession(headers=self.headers, timeout=self.timeout)
        return self._session

    async def close(self):
        """Закрыть HTTP сессию"""
        if self._session and not self._session.closed:
            await self._session.close()

    async def _send(self, method: str, url: str, params: dict | None) -> tuple[int, bytes]:
        """Один HTTP запрос без повторов: (status, body)."""
        session = await self._get_session()
        async with session.request(method, url, params=params) as response:
            return response.status, await response.read()

    async def _request(self, method: str, endpoint: str, params: dict | None = None) -> bytes:
        """
        Базовый метод для HTTP запросов с retry и rate limiting логикой.

        Retry стратегия:
        - Максимум max_retries повторов после первой попытки
        - Exponential backoff
        - Retry только при сетевых ошибках, 429 и 5xx (остальные 4xx сразу падают)

        Rate limiting:
        - Каждая попытка (включая повторы) проходит через общий ограничитель
        """
        url = f"{self.base_url}/{endpoint.lstrip('/')}"
        last_status: int | None = None

        retry_strategy = AsyncRetrying(
            retry=retry_if_exception_type((aiohttp.ClientError, asyncio.TimeoutError, _RetryableStatus)),
            stop=stop_after_attempt(self.max_retries + 1),
            wait=self.retry_wait,
            before_sleep=before_sleep_log(logger, logging.WARNING),
            reraise=False,
        )

        try:
            async for attempt in retry_strategy:
                with attempt:
                    async with self._semaphore:
                        # Метка окна ставится в момент отправки, а не в очереди на семафор
                        if self.rate_limiter is not None:
                            await self.rate_limiter.acquire()
                        self.request_count += 1
                        status, body = await self._send(method, url, params)
                    last_status = status

                    if status == 429 or status >= 500:
                        logger.warning(f"Retryable response from {endpoint}: HTTP {status}")
                        raise _RetryableStatus(status)

                    # Не делаем retry на клиентских ошибках
                    if 400 <= status < 500:
                        raise APIClientError(f"API error {status} for {endpoint}", status)

                    return body

        except RetryError as e:
            cause = e.last_attempt.exception()
            logger.error(f"API request to {endpoint} failed after retries: {cause}")
            raise APIConnectionError(
                f"Failed to fetch {endpoint} after {self.max_retries + 1} attempts: {cause}",
                status=last_status,
            ) from cause

        raise APIConnectionError(f"No response for {endpoint}", status=last_status)

    async def get_bytes(self, endpoint: str, params: dict | None = None) -> bytes:
        """GET запрос, сырое тело ответа"""
        return await self._request("GET", endpoint, params=params)

    async def get(self, endpoint: str, params: dict | None = None) -> dict:
        """GET запрос с разбором JSON"""
        return decode_json(await self.get_bytes(endpoint, params=params), endpoint)
