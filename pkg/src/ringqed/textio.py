"""Line-oriented structured text: sections, key/value pairs, numeric rows.

This is the one tiny parser behind every text artifact the package reads:
the materials database, run configs, device fleets and saved reports.  The
grammar is deliberately small:

* ``# ...`` comment lines (and trailing comments after a value),
* ``[section.name]`` headers,
* ``key = value`` pairs inside a section,
* bare whitespace-separated numeric rows inside a section (matrix blocks).

Every parse failure raises ParseError carrying the file path and the
1-based line number of the offending line.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field

from .errors import ParseError

__all__ = ["Section", "parse_blocks", "parse_blocks_file", "atomic_write_text"]


@dataclass
class Section:
    """One ``[name]`` block: scalar pairs plus optional numeric rows."""

    name: str
    line: int
    path: str | None = None
    pairs: dict = field(default_factory=dict)
    pair_lines: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    row_lines: list = field(default_factory=list)

    def _fail(self, message, line=None):
        raise ParseError(message, path=self.path,
                         line=self.line if line is None else line)

    def require(self, key):
        if key not in self.pairs:
            self._fail(f"section [{self.name}] is missing key '{key}'")
        return self.pairs[key]

    def get_str(self, key, default=None):
        if key not in self.pairs:
            if default is None:
                return self.require(key)
            return default
        return self.pairs[key]

    def get_float(self, key, default=None):
        if key not in self.pairs and default is not None:
            return float(default)
        raw = self.require(key)
        try:
            return float(raw)
        except ValueError:
            self._fail(f"key '{key}' in [{self.name}] is not a number: {raw!r}",
                       line=self.pair_lines[key])

    def get_int(self, key, default=None):
        if key not in self.pairs and default is not None:
            return int(default)
        raw = self.require(key)
        try:
            return int(raw)
        except ValueError:
            self._fail(f"key '{key}' in [{self.name}] is not an integer: {raw!r}",
                       line=self.pair_lines[key])

    def get_bool(self, key, default=None):
        if key not in self.pairs and default is not None:
            return bool(default)
        raw = self.require(key).strip().lower()
        if raw in ("true", "yes", "1", "on"):
            return True
        if raw in ("false", "no", "0", "off"):
            return False
        self._fail(f"key '{key}' in [{self.name}] is not a boolean: {raw!r}",
                   line=self.pair_lines[key])

    def matrix(self, n_rows, n_cols):
        """The section's numeric rows as a validated n_rows x n_cols list."""
        if len(self.rows) != n_rows:
            self._fail(f"section [{self.name}] needs {n_rows} numeric rows, "
                       f"found {len(self.rows)}")
        for row, line in zip(self.rows, self.row_lines):
            if len(row) != n_cols:
                self._fail(f"row has {len(row)} values, expected {n_cols}",
                           line=line)
        return self.rows


def _strip_comment(line):
    # full-line comments and trailing "  # ..." comments; values never
    # contain '#'
    if "#" in line:
        line = line.split("#", 1)[0]
    return line.strip()


def parse_blocks(text, path=None):
    """Parse structured text into an ordered {section_name: Section} dict."""
    sections: dict = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if not name:
                raise ParseError("empty section name", path=path, line=lineno)
            if name in sections:
                raise ParseError(f"duplicate section [{name}]",
                                 path=path, line=lineno)
            current = Section(name=name, line=lineno, path=path)
            sections[name] = current
            continue
        if current is None:
            raise ParseError("content before the first [section] header",
                             path=path, line=lineno)
        if "=" in line:
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if not key:
                raise ParseError("missing key before '='", path=path,
                                 line=lineno)
            if key in current.pairs:
                raise ParseError(
                    f"duplicate key '{key}' in section [{current.name}]",
                    path=path, line=lineno)
            current.pairs[key] = value
            current.pair_lines[key] = lineno
            continue
        # bare numeric row
        try:
            row = [float(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(f"expected 'key = value' or a numeric row, "
                             f"got {line!r}", path=path, line=lineno)
        current.rows.append(row)
        current.row_lines.append(lineno)
    return sections


def parse_blocks_file(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc}", path=str(path))
    return parse_blocks(text, path=str(path))


def atomic_write_text(path, text):
    """Write text so the destination is never observed half-written.

    The payload goes to a temp file in the same directory and is moved into
    place with os.replace.
    """
    path = str(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-",
                               suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
