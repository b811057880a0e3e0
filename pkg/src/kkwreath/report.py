"""Deterministic verification reports."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Assertion:
    name: str
    passed: bool
    witness: str = ""


@dataclass
class Report:
    command: str
    digest: str
    info: list[tuple[str, str]] = field(default_factory=list)
    assertions: list[Assertion] = field(default_factory=list)

    def note(self, key: str, value) -> None:
        self.info.append((key, str(value)))

    def check(self, name: str, passed: bool, witness="") -> None:
        self.assertions.append(Assertion(name, bool(passed), _one_line(str(witness))))

    def extend(self, items) -> None:
        for name, ok, witness in items:
            self.check(name, ok, witness)

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1


def _one_line(s: str) -> str:
    return " ".join(s.split())


def digest_inputs(args_text: str, files: list[tuple[str, bytes]]) -> str:
    h = hashlib.sha256()
    h.update(args_text.encode())
    for name, data in files:
        h.update(b"\0" + name.encode() + b"\0")
        h.update(data)
    return h.hexdigest()


def emit_report(r: Report, fmt: str = "text") -> bytes:
    if fmt == "machine":
        lines = [f"command {r.command}", f"inputs sha256:{r.digest}"]
        lines += [f"info {k} " + " ; ".join(_one_line(ln) for ln in v.splitlines()) for k, v in r.info]
        lines += [f"assertion {a.name} {'pass' if a.passed else 'fail'} {a.witness or '-'}"
                  for a in r.assertions]
    elif fmt == "text":
        lines = [f"command: {r.command}", f"inputs:  sha256 {r.digest}"]
        if r.info:
            lines.append("")
            for k, v in r.info:
                if "\n" in v:
                    lines.append(f"{k}:")
                    lines.extend("    " + ln for ln in v.splitlines())
                else:
                    lines.append(f"{k}: {v}")
        if r.assertions:
            lines.append("")
            width = max(len(a.name) for a in r.assertions)
            for a in r.assertions:
                tag = "PASS" if a.passed else "FAIL"
                lines.append(f"[{tag}] {a.name:<{width}}  {a.witness}".rstrip())
            n_ok = sum(a.passed for a in r.assertions)
            lines.append("")
            lines.append(f"{n_ok}/{len(r.assertions)} assertions passed")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return ("\n".join(lines) + "\n").encode()
