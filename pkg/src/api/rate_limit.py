"""Ограничение частоты запросов к внешнему API."""

import asyncio
import math
import time
from collections import deque
from collections.abc import Awaitable, Callable


class SlidingWindowRateLimiter:
    """
    Ограничитель частоты со скользящим окном.

    Ограничение: не более floor(rate) запросов в любом окне длиной 1 секунда
    (при rate < 1 один запрос за 1/rate секунд). Один экземпляр разделяется
    между всеми конкурентными запросами клиента.
    """

    def __init__(
        self,
        rate: float,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], Awaitable[None]] = asyncio.sleep,
    ):
        """
        Args:
            rate: Максимальное количество запросов в секунду
            clock: Источник времени (подменяется в тестах)
            sleep: Функция ожидания (подменяется в тестах)
        """
        if rate <= 0:
            raise ValueError(f"Rate must be positive, got {rate}")
        if rate >= 1:
            self.capacity = math.floor(rate)
            self.window = 1.0
        else:
            self.capacity = 1
            self.window = 1.0 / rate
        self.clock = clock
        self.sleep = sleep

        self.timestamps: deque[float] = deque()
        self._lock = asyncio.Lock()

    async def acquire(self) -> None:
        """Ждёт, пока в окне освободится место, и регистрирует запрос."""
        async with self._lock:
            while True:
                now = self.clock()

                while self.timestamps and now - self.timestamps[0] >= self.window:
                    self.timestamps.popleft()

                if len(self.timestamps) < self.capacity:
                    self.timestamps.append(now)
                    return

                await self.sleep(self.timestamps[0] + self.window - now)
