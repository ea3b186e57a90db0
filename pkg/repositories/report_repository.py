import json
import logging
from pathlib import Path

from pydantic import BaseModel

logger = logging.getLogger(__name__)


class ReportRepository:
    """JSON artifacts (property reports, fixed-point results)."""

    def __init__(self, root: Path | None = None):
        self.root = Path(root) if root else None

    def _resolve(self, path: str | Path) -> Path:
        path = Path(path)
        if self.root and not path.is_absolute():
            path = self.root / path
        return path

    def save(self, path: str | Path, record: BaseModel) -> Path:
        resolved = self._resolve(path)
        resolved.parent.mkdir(parents=True, exist_ok=True)
        payload = record.model_dump(mode="json", by_alias=True)
        resolved.write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        logger.info("wrote %s to %s", type(record).__name__, resolved)
        return resolved

    def load(self, path: str | Path) -> dict:
        return json.loads(self._resolve(path).read_text(encoding="utf-8"))
