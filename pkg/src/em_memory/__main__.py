# em_memory/src/em_memory/__main__.py
"""Point d'entrée console `em-memory` et `python -m em_memory`."""

from __future__ import annotations

import sys
from typing import Optional, Sequence


def cli(argv: Optional[Sequence[str]] = None) -> int:
    """Lance main() et ramène toute sortie à un code entier."""
    try:
        from .main import main
    except ImportError as exc:  # pragma: no cover
        sys.stderr.write(f"Failed to import em_memory.main: {exc}\n")
        return 1

    try:
        return int(main(argv) or 0)
    except SystemExit as se:
        # argparse: --help -> 0, option invalide -> 2
        if se.code is None:
            return 0
        return se.code if isinstance(se.code, int) else 1
    except Exception as exc:  # pragma: no cover
        sys.stderr.write(f"Unhandled error: {exc}\n")
        return 1


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(cli())
