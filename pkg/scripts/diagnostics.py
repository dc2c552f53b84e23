#!/usr/bin/env python
"""Diagnostic script for the treeaudit environment.

Checks:
 - Python & platform info
 - Required packages importable, with versions
 - Config loading and validation
 - Output directory writable
 - Smoke audit: a handful of canonical formulas against the oracle

Outputs a structured summary (print + JSON).
"""
from __future__ import annotations

import argparse
import importlib
import json
import os
import platform
import socket
import sys
import tempfile
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, Optional

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

REQUIRED_PACKAGES = ("pydantic", "networkx", "numpy")


@dataclass
class SectionResult:
    ok: bool
    detail: str = ""
    extra: Optional[Dict[str, Any]] = None


@dataclass
class Diagnostics:
    python: SectionResult
    packages: SectionResult
    config: SectionResult
    output_dir: SectionResult
    smoke: SectionResult
    meta: Dict[str, Any]


def check_python() -> SectionResult:
    return SectionResult(
        ok=sys.version_info >= (3, 11),
        detail=f"Python {platform.python_version()} ({sys.executable}) on {platform.platform()}",
        extra={"cwd": os.getcwd()},
    )


def check_packages() -> SectionResult:
    versions: Dict[str, str] = {}
    missing = []
    for name in REQUIRED_PACKAGES:
        try:
            mod = importlib.import_module(name)
            versions[name] = getattr(mod, "__version__", "unknown")
        except Exception:
            missing.append(name)
    ok = not missing
    return SectionResult(ok=ok, detail="All present" if ok else f"Missing: {', '.join(missing)}", extra={"versions": versions})


def load_config_module() -> SectionResult:
    try:
        cfg_mod = importlib.import_module("config")
        cfg = getattr(cfg_mod, "Config")
        ok = bool(cfg.validate())
        return SectionResult(
            ok=ok,
            detail="Config valid" if ok else "Config validation failed (see log)",
            extra={"max_vertices": cfg.MAX_VERTICES, "output_dir": str(cfg.output_dir())},
        )
    except Exception as e:  # pragma: no cover
        return SectionResult(ok=False, detail=f"Import failed: {e}")


def check_output_dir() -> SectionResult:
    try:
        from config import Config

        directory = Config.output_dir()
        directory.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(dir=directory, prefix=".treeaudit-", delete=True):
            pass
        return SectionResult(ok=True, detail=f"Writable: {directory}")
    except Exception as e:
        return SectionResult(ok=False, detail=str(e))


def check_smoke() -> SectionResult:
    """T-graph, Cayley and MFPT spot values against the brute-force oracle."""
    try:
        from closed_forms import cayley_wiener, eq31
        from growth_ops import grow
        from models.tree_models import Family, ModelSpec
        from random_walk import exact_mfpt
        from tree_core import path_tree, wiener_oracle

        checks = {
            "tgraph_t2": (wiener_oracle(grow(ModelSpec(family=Family.TGRAPH, t=2))), int(eq31(2))),
            "cayley_n3_t2": (wiener_oracle(grow(ModelSpec(family=Family.CAYLEY, n=3, t=2))), cayley_wiener(3, 2)),
            "mfpt_p3": (str(exact_mfpt(path_tree(3))), "8/3"),
        }
        failed = [k for k, (oracle, value) in checks.items() if oracle != value]
        return SectionResult(
            ok=not failed,
            detail="Canonical values match" if not failed else f"Mismatch: {', '.join(failed)}",
            extra={k: {"oracle": str(o), "formula": str(v)} for k, (o, v) in checks.items()},
        )
    except Exception as e:  # pragma: no cover
        return SectionResult(ok=False, detail=f"Smoke audit failed: {e}")


def main() -> None:
    ap = argparse.ArgumentParser(description="Diagnostics for treeaudit")
    ap.add_argument("--json", action="store_true", help="Only output JSON result")
    ap.add_argument("--no-smoke", action="store_true", help="Skip the smoke audit")
    args = ap.parse_args()

    started = time.time()
    results = Diagnostics(
        python=check_python(),
        packages=check_packages(),
        config=load_config_module(),
        output_dir=check_output_dir(),
        smoke=SectionResult(ok=True, detail="Skipped") if args.no_smoke else check_smoke(),
        meta={
            "hostname": socket.gethostname(),
            "duration_sec": round(time.time() - started, 3),
            "no_smoke": args.no_smoke,
        },
    )

    data = asdict(results)
    if args.json:
        print(json.dumps(data, ensure_ascii=False, indent=2))
    else:
        print("==== treeaudit Diagnostics ====")
        for name, res in [
            ("Python", results.python),
            ("Packages", results.packages),
            ("Config", results.config),
            ("Output", results.output_dir),
            ("Smoke", results.smoke),
        ]:
            status = "OK" if res.ok else "FAIL"
            print(f"[{name:<8}] {status} - {res.detail}")
            if res.extra:
                print(f"    extra: {res.extra}")
        print(f"Meta: {results.meta}")

    if not (results.packages.ok and results.smoke.ok):
        sys.exit(2)


if __name__ == "__main__":
    main()
