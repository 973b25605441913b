# src/db.py
import asyncio
import json
from dataclasses import dataclass, field
from pathlib import Path

from config import logger
from harvester import AuthorCandidate, WorkRecord
from namekit import NameVariant, VariantKind
from sqlalchemy import Boolean, Integer, LargeBinary, String, Text, delete, select
from sqlalchemy.ext.asyncio import AsyncEngine, AsyncSession, async_sessionmaker, create_async_engine
from sqlalchemy.orm import DeclarativeBase, Mapped, mapped_column


class Base(DeclarativeBase): ...


class ApiResponse(Base):
    """Сырые ответы API по ключу запроса (кэш для докачки)"""

    __tablename__ = "api_responses"
    request_key: Mapped[str] = mapped_column(String(64), primary_key=True)
    request_line: Mapped[str] = mapped_column(Text)
    body: Mapped[bytes] = mapped_column(LargeBinary)


class HarvestedCandidate(Base):
    __tablename__ = "harvested_candidates"
    id: Mapped[int] = mapped_column(primary_key=True, autoincrement=True)
    researcher_id: Mapped[str] = mapped_column(String(255), index=True)
    position: Mapped[int] = mapped_column(Integer)
    author_id: Mapped[str] = mapped_column(String(64), index=True)
    display_name: Mapped[str] = mapped_column(Text)
    works_count: Mapped[int] = mapped_column(Integer, default=0)
    variant_text: Mapped[str] = mapped_column(Text)
    variant_kind: Mapped[str] = mapped_column(String(32))
    variant_given_count: Mapped[int] = mapped_column(Integer, default=0)


class HarvestedWork(Base):
    __tablename__ = "harvested_works"
    author_id: Mapped[str] = mapped_column(String(64), primary_key=True)
    work_id: Mapped[str] = mapped_column(String(64), primary_key=True)
    position: Mapped[int] = mapped_column(Integer)
    record: Mapped[str] = mapped_column(Text)  # WorkRecord.to_dict() в JSON


class HarvestProgress(Base):
    __tablename__ = "harvest_progress"
    researcher_id: Mapped[str] = mapped_column(String(255), primary_key=True)
    completed: Mapped[bool] = mapped_column(Boolean, default=False)
    skipped_works: Mapped[int] = mapped_column(Integer, default=0)


@dataclass
class ResearcherHarvest:
    """Результат сбора по одному исследователю"""

    researcher_id: str
    candidates: list[AuthorCandidate]
    works: dict[str, list[WorkRecord]] = field(default_factory=dict)
    skipped_works: int = 0


@dataclass
class HarvestSnapshot:
    candidates: dict[str, list[AuthorCandidate]] = field(default_factory=dict)
    works: dict[str, list[WorkRecord]] = field(default_factory=dict)
    skipped_works: dict[str, int] = field(default_factory=dict)

    @property
    def completed(self) -> set[str]:
        return set(self.candidates)


def _engine_for(path: Path) -> AsyncEngine:
    return create_async_engine(f"sqlite+aiosqlite:///{path}", echo=False)


class SnapshotStore:
    """
    Снимок сбора в SQLite: ответы API, кандидаты, работы и прогресс.

    Используется как ResponseCache для клиента OpenAlex, поэтому
    повторный запуск не повторяет уже выполненные запросы.
    """

    def __init__(self, path: Path):
        self.path = Path(path)
        self.engine: AsyncEngine | None = None
        self.SessionLocal: async_sessionmaker[AsyncSession] | None = None
        # Все обращения к SQLite идут по очереди
        self._lock = asyncio.Lock()

    async def init_db(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.engine = _engine_for(self.path)
        self.SessionLocal = async_sessionmaker(self.engine, expire_on_commit=False, class_=AsyncSession)
        async with self.engine.begin() as conn:
            await conn.run_sync(Base.metadata.create_all)

    async def dispose(self) -> None:
        if self.engine is not None:
            await self.engine.dispose()
            self.engine = None

    async def __aenter__(self) -> "SnapshotStore":
        await self.init_db()
        return self

    async def __aexit__(self, *exc_info) -> None:
        await self.dispose()

    # ===== ResponseCache =====

    async def get_response(self, key: str) -> bytes | None:
        async with self._lock, self.SessionLocal() as session:
            row = await session.get(ApiResponse, key)
            return row.body if row else None

    async def put_response(self, key: str, line: str, body: bytes) -> None:
        async with self._lock, self.SessionLocal() as session:
            await session.merge(ApiResponse(request_key=key, request_line=line, body=body))
            await session.commit()

    # ===== Прогресс сбора =====

    async def is_completed(self, researcher_id: str) -> bool:
        async with self._lock, self.SessionLocal() as session:
            row = await session.get(HarvestProgress, researcher_id)
            return bool(row and row.completed)

    async def save_researcher(self, result: ResearcherHarvest) -> None:
        """Сохраняет кандидатов и работы исследователя одной транзакцией и помечает его собранным."""
        async with self._lock, self.SessionLocal() as session:
            await session.execute(
                delete(HarvestedCandidate).where(HarvestedCandidate.researcher_id == result.researcher_id)
            )
            for position, candidate in enumerate(result.candidates):
                session.add(
                    HarvestedCandidate(
                        researcher_id=result.researcher_id,
                        position=position,
                        author_id=candidate.author_id,
                        display_name=candidate.display_name,
                        works_count=candidate.works_count,
                        variant_text=candidate.queried_variant.text,
                        variant_kind=str(candidate.queried_variant.kind),
                        variant_given_count=candidate.queried_variant.given_count,
                    )
                )
            for author_id, records in result.works.items():
                for position, record in enumerate(records):
                    await session.merge(
                        HarvestedWork(
                            author_id=author_id,
                            work_id=record.work_id,
                            position=position,
                            record=json.dumps(record.to_dict(), sort_keys=True, ensure_ascii=False),
                        )
                    )
            await session.merge(
                HarvestProgress(
                    researcher_id=result.researcher_id, completed=True, skipped_works=result.skipped_works
                )
            )
            await session.commit()
        logger.debug(f"Saved harvest of {result.researcher_id}: {len(result.candidates)} candidates")

    async def load_snapshot(self) -> HarvestSnapshot:
        """Читает весь снимок; кандидаты есть только у завершённых исследователей."""
        snapshot = HarvestSnapshot()
        async with self.SessionLocal() as session:
            progress = await session.execute(select(HarvestProgress).where(HarvestProgress.completed))
            for row in progress.scalars():
                snapshot.candidates[row.researcher_id] = []
                snapshot.skipped_works[row.researcher_id] = row.skipped_works

            candidates = await session.execute(
                select(HarvestedCandidate).order_by(
                    HarvestedCandidate.researcher_id, HarvestedCandidate.position
                )
            )
            for row in candidates.scalars():
                if row.researcher_id not in snapshot.candidates:
                    continue
                variant = NameVariant(
                    text=row.variant_text,
                    kind=VariantKind(row.variant_kind),
                    given_count=row.variant_given_count,
                )
                snapshot.candidates[row.researcher_id].append(
                    AuthorCandidate(
                        author_id=row.author_id,
                        display_name=row.display_name,
                        works_count=row.works_count,
                        queried_variant=variant,
                    )
                )

            works = await session.execute(
                select(HarvestedWork).order_by(
                    HarvestedWork.author_id, HarvestedWork.position, HarvestedWork.work_id
                )
            )
            for row in works.scalars():
                record = WorkRecord.from_dict(json.loads(row.record))
                snapshot.works.setdefault(row.author_id, []).append(record)
        return snapshot
