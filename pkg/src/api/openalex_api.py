# src/api/openalex_api.py

import logging
from collections.abc import AsyncIterator
from typing import Any, Protocol

from .base import BaseAPIClient, decode_json
from .fixtures import FixtureMissError, FixtureStore, request_key, request_line
from .rate_limit import SlidingWindowRateLimiter

logger = logging.getLogger(__name__)


class ResponseCache(Protocol):
    """Кэш ответов по ключу запроса (снимок прогона, для докачки)"""

    async def get_response(self, key: str) -> bytes | None: ...

    async def put_response(self, key: str, line: str, body: bytes) -> None: ...


class OpenAlexAPI(BaseAPIClient):
    """Клиент OpenAlex API с курсорной пагинацией и record/replay фикстурами"""

    def __init__(
        self,
        base_url: str,
        *,
        replay_only: bool = False,
        fixtures: FixtureStore | None = None,
        cache: ResponseCache | None = None,
        mailto: str | None = None,
        page_size: int = 200,
        rate_limiter: SlidingWindowRateLimiter | None = None,
        **kwargs,
    ):
        """
        Args:
            base_url: Адрес API (например, https://api.openalex.org)
            replay_only: Режим фикстур: отвечать только из каталога фикстур
            fixtures: Каталог фикстур (в живом режиме туда записываются ответы)
            cache: Кэш уже полученных ответов (снимок прогона)
            mailto: Адрес для "polite pool" OpenAlex
            page_size: Размер страницы (per-page), 1..200
        """
        headers = {"Accept": "application/json"}
        super().__init__(base_url=base_url, headers=headers, rate_limiter=rate_limiter, **kwargs)
        if replay_only and fixtures is None:
            raise ValueError("Replay mode requires a fixture directory")
        self.replay_only = replay_only
        self.fixtures = fixtures
        self.cache = cache
        self.mailto = mailto
        self.page_size = page_size

    async def fetch_json(self, endpoint: str, params: dict[str, Any]) -> dict[str, Any]:
        """
        Получить JSON-ответ: из кэша, из фикстур или из сети.

        Raises:
            FixtureMissError: в режиме фикстур нет файла для запроса
        """
        key = request_key("GET", endpoint, params)
        line = request_line("GET", endpoint, params)

        body = await self.cache.get_response(key) if self.cache is not None else None
        if body is None:
            if self.replay_only:
                body = self.fixtures.load(key)
                if body is None:
                    raise FixtureMissError(key, line)
            else:
                query = dict(params)
                if self.mailto:
                    query["mailto"] = self.mailto
                body = await self.get_bytes(endpoint, params=query)
                if self.fixtures is not None:
                    self.fixtures.save(key, line, body)
            if self.cache is not None:
                await self.cache.put_response(key, line, body)

        return decode_json(body, line)

    async def paginate(self, endpoint: str, params: dict[str, Any]) -> AsyncIterator[list[dict]]:
        """
        Обходит все страницы курсором, отдавая списки results.

        Останавливается на пустой странице или при отсутствии next_cursor.
        """
        cursor = "*"
        while cursor:
            page = await self.fetch_json(endpoint, {**params, "per-page": self.page_size, "cursor": cursor})
            results = page.get("results") or []
            if not results:
                return
            yield results
            cursor = (page.get("meta") or {}).get("next_cursor")

    # ===== AUTHORS =====

    async def search_authors(self, query: str) -> list[dict]:
        """Все авторы, найденные поиском по имени"""
        authors: list[dict] = []
        async for results in self.paginate("/authors", {"search": query}):
            authors.extend(results)
        return authors

    # ===== WORKS =====

    async def get_author_works(self, author_id: str) -> list[dict]:
        """Все работы автора"""
        works: list[dict] = []
        async for results in self.paginate("/works", {"filter": f"author.id:{author_id}"}):
            works.extend(results)
        return works
