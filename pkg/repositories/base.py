from pathlib import Path
from typing import Optional, Union

from core.errors import ConfigError


class BaseRepository:
    def __init__(self, root: Optional[Union[str, Path]] = None):
        self.root = Path(root) if root is not None else Path.cwd()

    def resolve(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        return path if path.is_absolute() else self.root / path

    def existing(self, path: Union[str, Path]) -> Path:
        resolved = self.resolve(path)
        if not resolved.is_file():
            raise ConfigError(f"file not found: {path}", path=str(path))
        return resolved
