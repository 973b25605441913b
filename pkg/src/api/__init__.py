# src/api/__init__.py
from .base import APIClientError, APIConnectionError, APIDecodeError, APIError, BaseAPIClient
from .fixtures import FixtureMissError, FixtureStore, request_key, request_line
from .openalex_api import OpenAlexAPI, ResponseCache
from .rate_limit import SlidingWindowRateLimiter

__all__ = [
    "BaseAPIClient",
    "APIError",
    "APIClientError",
    "APIConnectionError",
    "APIDecodeError",
    "FixtureMissError",
    "FixtureStore",
    "request_key",
    "request_line",
    "OpenAlexAPI",
    "ResponseCache",
    "SlidingWindowRateLimiter",
]
