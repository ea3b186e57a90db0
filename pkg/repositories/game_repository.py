import json
import logging
from pathlib import Path

from pydantic import ValidationError

from core.exceptions import InvalidInputError
from models.domain import MatrixGame
from models.models import GameFile

logger = logging.getLogger(__name__)


class GameRepository:
    def __init__(self, root: Path | None = None):
        self.root = Path(root) if root else None

    def _resolve(self, path: str | Path) -> Path:
        path = Path(path)
        if self.root and not path.is_absolute():
            path = self.root / path
        return path

    def get(self, path: str | Path) -> MatrixGame:
        resolved = self._resolve(path)
        try:
            raw = json.loads(resolved.read_text(encoding="utf-8"))
            record = GameFile.model_validate(raw)
        except FileNotFoundError as exc:
            raise InvalidInputError(f"game file not found: {resolved}") from exc
        except (json.JSONDecodeError, ValidationError) as exc:
            raise InvalidInputError(f"invalid game file {resolved}: {exc}") from exc
        logger.debug("loaded %dx%d game from %s", record.n, record.n, resolved)
        return MatrixGame.from_rows(record.payoff_matrix, name=record.name)

    def save(self, path: str | Path, game: MatrixGame) -> Path:
        resolved = self._resolve(path)
        record = GameFile(
            n=game.n, payoff_matrix=game.payoff_matrix.tolist(), name=game.name
        )
        resolved.parent.mkdir(parents=True, exist_ok=True)
        resolved.write_text(
            json.dumps(record.model_dump(exclude_none=True), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        return resolved
