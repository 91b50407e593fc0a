"""Download classification matrices into a local corpus directory.

A list is a text document holding one or more headerless relation
matrices separated by blank lines (lines starting with '#' are ignored).
Each matrix is stored as ``as<list>_<kkk>.scheme`` in canonical format, and a
``manifest.json`` records SHA-256 digests.  Nothing is written unless the
whole download and conversion succeed.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from .scheme import SchemeFormatError, parse_scheme, serialize

ENV_URL = "QUASITHIN_CORPUS_URL"
# Unverified default; override with --base-url or the environment variable.
DEFAULT_BASE_URL = "http://math.shinshu-u.ac.jp/~hanaki/as/data"
MANIFEST = "manifest.json"


class FetchError(RuntimeError):
    pass


@dataclass
class ManifestEntry:
    identifier: str
    path: str
    sha256: str


@dataclass
class CorpusManifest:
    source: Optional[str]
    list_id: Optional[str]
    entries: List[ManifestEntry] = field(default_factory=list)

    def to_json(self) -> str:
        data = {"source": self.source, "list": self.list_id,
                "entries": [{"id": e.identifier, "path": e.path, "sha256": e.sha256} for e in self.entries]}
        return json.dumps(data, sort_keys=True, indent=2) + "\n"


def sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def load_manifest(dest, verify: bool = True) -> CorpusManifest:
    dest = Path(dest)
    data = json.loads((dest / MANIFEST).read_text(encoding="utf-8"))
    man = CorpusManifest(data.get("source"), data.get("list"),
                         [ManifestEntry(e["id"], e["path"], e["sha256"]) for e in data["entries"]])
    if verify:
        for e in man.entries:
            p = dest / e.path
            if not p.exists():
                raise FetchError(f"manifest entry {e.identifier}: missing file {e.path}")
            if sha256(p.read_text(encoding="utf-8")) != e.sha256:
                raise FetchError(f"manifest entry {e.identifier}: checksum mismatch for {e.path}")
    return man


def split_matrices(text: str) -> List[str]:
    """Split a document into blocks of consecutive non-blank data lines."""
    blocks, cur = [], []
    for raw in text.replace("\r\n", "\n").split("\n"):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            if cur:
                blocks.append("\n".join(cur))
                cur = []
            continue
        cur.append(line)
    if cur:
        blocks.append("\n".join(cur))
    return blocks


def list_url(base_url: str, list_id: str) -> str:
    return base_url.rstrip("/") + f"/as{list_id}"


def download(url: str, timeout: float = 30.0) -> str:
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            return resp.read().decode("utf-8")
    except (urllib.error.URLError, OSError, UnicodeDecodeError) as exc:
        raise FetchError(f"could not download {url}: {exc}") from exc


def fetch_corpus(base_url: Optional[str], list_id: str, dest, timeout: float = 30.0) -> tuple:
    """Fetch one list; returns (manifest, number of files written).

    Re-running with unchanged upstream data rewrites nothing.  If a file
    recorded in an existing manifest would change, FetchError is raised and
    nothing is touched.
    """
    base = base_url or os.environ.get(ENV_URL) or DEFAULT_BASE_URL
    url = list_url(base, list_id)
    text = download(url, timeout)
    blocks = split_matrices(text)
    if not blocks:
        raise FetchError(f"{url}: no matrices found")
    converted = []
    for k, block in enumerate(blocks, 1):
        ident = f"{list_id}-{k}"
        try:
            s = parse_scheme(block, headerless=True, name=ident)
        except SchemeFormatError as exc:
            raise FetchError(f"{url}: matrix {k}: {exc}") from exc
        body = serialize(s, comment=ident)
        converted.append((ManifestEntry(ident, f"as{list_id}_{k:03d}.scheme", sha256(body)), body))
    dest = Path(dest)
    if (dest / MANIFEST).exists():
        old = {e.identifier: e for e in load_manifest(dest, verify=False).entries}
        for e, _ in converted:
            prev = old.get(e.identifier)
            if prev is not None and prev.sha256 != e.sha256:
                raise FetchError(f"checksum mismatch for {e.identifier}: upstream content changed")
    dest.mkdir(parents=True, exist_ok=True)
    written = 0
    for e, body in converted:
        p = dest / e.path
        if p.exists() and sha256(p.read_text(encoding="utf-8")) == e.sha256:
            continue
        _atomic_write(p, body)
        written += 1
    man = CorpusManifest(url, list_id, [e for e, _ in converted])
    text_out = man.to_json()
    mp = dest / MANIFEST
    if not mp.exists() or mp.read_text(encoding="utf-8") != text_out:
        _atomic_write(mp, text_out)
        written += 1
    return man, written


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)
