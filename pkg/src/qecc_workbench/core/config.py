"""Workbench configuration: config directory, user catalog and YAML run files."""

from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from .catalog import StabilizerCode, load_catalog, register_code, validate_code
from .errors import CatalogFormatError


class ConfigManager:
    """Manages the configuration directory and run-parameter files."""

    def __init__(self, config_dir: Optional[Path] = None):
        """Initialize config manager.

        Args:
            config_dir: Directory for configuration files. Defaults to ~/.qecc-workbench
        """
        if config_dir is None:
            config_dir = Path.home() / ".qecc-workbench"

        self.config_dir = config_dir
        self.config_dir.mkdir(parents=True, exist_ok=True)
        (self.config_dir / "tables").mkdir(exist_ok=True)

    @property
    def tables_path(self) -> Path:
        """Path to the decoder-table cache."""
        return self.config_dir / "tables"

    @property
    def user_catalog_path(self) -> Path:
        """Path to the optional catalog of user-defined codes."""
        return self.config_dir / "catalog.txt"

    def load_user_codes(self) -> Dict[str, StabilizerCode]:
        """Register every valid code from the user catalog.

        Codes failing validation are rejected; a user code may replace a
        bundled one of the same name.
        """
        if not self.user_catalog_path.exists():
            return {}
        codes = load_catalog(self.user_catalog_path)
        for code in codes.values():
            report = validate_code(code)
            if not report.ok:
                raise CatalogFormatError(
                    f"User code {code.name} fails checks: {', '.join(report.failures)}"
                )
            register_code(code, replace=True)
        return codes

    def load_run_config(self, config_path: Path, section: str) -> Dict[str, Any]:
        """Load the parameters for one subcommand from a YAML file.

        The file holds one top-level mapping per subcommand name; a missing
        section yields an empty mapping.
        """
        if not config_path.exists():
            raise FileNotFoundError(f"Config file not found: {config_path}")

        try:
            data = yaml.safe_load(config_path.read_text(encoding="utf-8")) or {}
        except yaml.YAMLError as e:
            raise ValueError(f"Invalid YAML in {config_path}: {e}")

        if not isinstance(data, dict):
            raise ValueError(f"Config file {config_path} must contain a mapping")
        values = data.get(section) or {}
        if not isinstance(values, dict):
            raise ValueError(f"Section '{section}' in {config_path} must be a mapping")
        return {str(k).replace("-", "_"): v for k, v in values.items()}
