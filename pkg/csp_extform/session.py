"""Run session: owns the output folder, numbers the artifacts, keeps the manifest."""

from __future__ import annotations

import json
from datetime import datetime
from pathlib import Path
from typing import Any

import pandas as pd

from csp_extform import __version__
from csp_extform.logger import RunLogger


class RunSession:
    """One CLI invocation's output folder and its numbered artifacts."""

    MANIFEST_NAME = ".extform_run.json"

    def __init__(self, input_path: str | None, command: str, out_dir: str | None = None) -> None:
        self.command = command
        self.input_path = Path(input_path).resolve() if input_path else None
        if self.input_path is not None and not self.input_path.exists():
            raise FileNotFoundError(f"File not found: {self.input_path}")
        self.name = self.input_path.stem if self.input_path else command
        self.output_dir = Path(out_dir).resolve() if out_dir else self._default_output_dir()
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.created_at = datetime.now().isoformat()
        self.step = 0
        self.artifacts: list[Path] = []
        self.logger = RunLogger(self.output_dir, command)
        source = self.input_path.name if self.input_path else "generated instances"
        self.logger.log("Run started", f"Command '{command}' on {source}")
        self._write_manifest()

    def _default_output_dir(self) -> Path:
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        parent = self.input_path.parent if self.input_path else Path.cwd()
        safe_name = self.name.replace(" ", "_").lower()
        return parent / f"{safe_name}_extform_{timestamp}"

    def _next_path(self, label: str) -> Path:
        self.step += 1
        safe_label = label.replace(" ", "_").lower()
        return self.output_dir / f"{self.step:02d}_{safe_label}"

    def _record(self, path: Path) -> Path:
        self.artifacts.append(path)
        self._write_manifest()
        return path

    def save_text(self, label: str, text: str) -> Path:
        """Save a text artifact; ``label`` carries the extension (e.g. 'model.lp')."""
        path = self._next_path(label)
        path.write_text(text)
        return self._record(path)

    def save_json(self, label: str, data: Any) -> Path:
        path = self._next_path(label)
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
        return self._record(path)

    def save_frame(self, df: pd.DataFrame, label: str) -> Path:
        path = self._next_path(label)
        df.to_csv(path, index=False)
        return self._record(path)

    def _write_manifest(self) -> None:
        manifest = {
            "extform_version": __version__,
            "command": self.command,
            "input_path": str(self.input_path) if self.input_path else None,
            "created_at": self.created_at,
            "last_updated_at": datetime.now().isoformat(),
            "step": self.step,
            "artifacts": [p.name for p in self.artifacts],
        }
        with open(self.output_dir / self.MANIFEST_NAME, "w") as f:
            json.dump(manifest, f, indent=2, default=str)

    @staticmethod
    def is_run_dir(path: str) -> bool:
        """Return True if path is a directory holding a csp-extform manifest."""
        p = Path(path).resolve()
        return p.is_dir() and (p / RunSession.MANIFEST_NAME).is_file()

    @classmethod
    def from_output_dir(cls, path: str, command: str) -> "RunSession":
        """Continue numbering artifacts in an existing run folder."""
        output_dir = Path(path).resolve()
        with open(output_dir / cls.MANIFEST_NAME) as f:
            manifest = json.load(f)
        for key in ("step", "artifacts"):
            if key not in manifest:
                raise ValueError(f"Invalid run manifest: missing required key '{key}'")

        session = cls.__new__(cls)
        session.command = command
        session.input_path = Path(manifest["input_path"]) if manifest.get("input_path") else None
        session.name = session.input_path.stem if session.input_path else command
        session.output_dir = output_dir
        session.created_at = manifest.get("created_at", datetime.now().isoformat())
        session.step = manifest["step"]
        session.artifacts = [output_dir / name for name in manifest["artifacts"]]
        session.logger = RunLogger(output_dir, command, append=True)
        session.logger.log("Run resumed", f"Command '{command}' continuing at step {session.step}")
        session._write_manifest()
        return session
