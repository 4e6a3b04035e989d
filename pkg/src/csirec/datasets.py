"""Public benchmark data.

MovieLens 100k is taken from the ``recbole`` 1.2.1 wheel on PyPI, which
ships the GroupLens ``u.data`` ratings verbatim (as ``ml-100k.inter`` with a
one-line header). Both the wheel and the extracted file are hash-checked.
"""

from __future__ import annotations

import hashlib
import io
import os
import urllib.request
import zipfile
from pathlib import Path

ML100K_WHEEL_URL = (
    "https://files.pythonhosted.org/packages/ab/fe/"
    "7d606cb7cd2b166a36b100cb9435d21014ceee16c192d972deb0976967a8/"
    "recbole-1.2.1-py3-none-any.whl"
)
ML100K_WHEEL_SHA256 = "9c9948202011f37eb0a7c6768129313f00d6403ad221ec940d5e2d5d5f33a407"
ML100K_MEMBER = "recbole/dataset_example/ml-100k/ml-100k.inter"
# sha256 of the reconstructed tab-separated u.data (100000 lines)
ML100K_UDATA_SHA256 = "06416e597f82b7342361e41163890c81036900f418ad91315590814211dca490"

BUILTIN = {"builtin:ml-100k": "ml-100k"}


def cache_dir() -> Path:
    root = os.environ.get("CSIREC_DATA")
    if root:
        return Path(root)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "csirec"


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def movielens_100k(directory: str | os.PathLike | None = None) -> Path:
    """Path to a verified copy of MovieLens 100k ``u.data``; downloads on first use."""
    target = Path(directory) if directory else cache_dir() / "ml-100k"
    path = target / "u.data"
    if path.exists() and _sha256(path.read_bytes()) == ML100K_UDATA_SHA256:
        return path
    with urllib.request.urlopen(ML100K_WHEEL_URL, timeout=120) as resp:
        wheel = resp.read()
    if _sha256(wheel) != ML100K_WHEEL_SHA256:
        raise OSError("downloaded MovieLens archive failed its checksum")
    with zipfile.ZipFile(io.BytesIO(wheel)) as zf:
        lines = zf.read(ML100K_MEMBER).decode("utf-8").splitlines()[1:]
    data = ("\n".join(lines) + "\n").encode("utf-8")
    if _sha256(data) != ML100K_UDATA_SHA256:
        raise OSError("extracted MovieLens ratings failed their checksum")
    target.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".part")
    tmp.write_bytes(data)
    tmp.replace(path)
    return path


def resolve(dataset: str) -> tuple[Path, str | None]:
    """Map a dataset argument to a file path and, for builtins, its preset format."""
    if dataset in BUILTIN:
        return movielens_100k(), BUILTIN[dataset]
    return Path(dataset), None
