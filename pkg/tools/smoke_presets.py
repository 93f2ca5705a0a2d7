import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from cli.main import reproduce
from cli.presets import PRESETS
from shared.models import OutputFormat

if __name__ == "__main__":
    with tempfile.TemporaryDirectory() as tmp:
        for name in PRESETS:
            try:
                written = reproduce(name, str(Path(tmp) / name), OutputFormat.CSV)
            except Exception as exc:
                print(name, "FAILED", exc)
                continue
            for path in written:
                rows = sum(1 for line in path.read_text(encoding="utf-8").splitlines() if not line.startswith("#"))
                print(f"{name}: {path.name} ({rows - 1} rows)")
