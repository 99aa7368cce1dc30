import json
import logging
from pathlib import Path
from typing import Any, Dict, Type, TypeVar, Union

import pandas as pd
from pydantic import BaseModel, ValidationError

from core.errors import ConfigError
from repositories.base import BaseRepository
from schemas.chart import AtlasDocument, ChartDocument, ModelDocument
from schemas.suite import SuiteSpec

logger = logging.getLogger(__name__)

D = TypeVar("D", bound=BaseModel)


class DocumentRepository(BaseRepository):
    def read(self, path: Union[str, Path]) -> Dict[str, Any]:
        resolved = self.existing(path)
        try:
            return json.loads(resolved.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})", path=str(path)) from exc

    def load(self, path: Union[str, Path], schema: Type[D]) -> D:
        data = self.read(path)
        try:
            return schema.model_validate(data)
        except ValidationError as exc:
            raise ConfigError(f"{path}: not a valid {schema.__name__}: {exc.errors()[0]['msg']}", path=str(path)) from exc

    def load_model(self, path: Union[str, Path]) -> ChartDocument:
        """Model documents carry a model_id; anything else is read as a bare chart."""
        schema = ModelDocument if "model_id" in self.read(path) else ChartDocument
        return self.load(path, schema)

    def load_atlas(self, path: Union[str, Path]) -> AtlasDocument:
        return self.load(path, AtlasDocument)

    def load_suite(self, path: Union[str, Path]) -> SuiteSpec:
        return self.load(path, SuiteSpec)

    def save(self, path: Union[str, Path], document: Union[BaseModel, Dict[str, Any]]) -> Path:
        resolved = self.resolve(path)
        resolved.parent.mkdir(parents=True, exist_ok=True)
        data = document.model_dump(mode="json") if isinstance(document, BaseModel) else document
        resolved.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        logger.info("wrote %s", resolved)
        return resolved

    def save_csv(self, path: Union[str, Path], frame: pd.DataFrame) -> Path:
        resolved = self.resolve(path)
        resolved.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(resolved, index=False)
        logger.info("wrote %s (%d rows)", resolved, len(frame))
        return resolved
